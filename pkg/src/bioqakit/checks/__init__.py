"""Check modules for bioqakit."""
