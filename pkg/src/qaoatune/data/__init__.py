"""Packaged data files (transfer library). Regenerate via tools/build_transfer_library.py."""
