"""Manifest enumeration, stream files, batch runs and reports."""
