"""Forensic triage of instant-messaging artifacts in iOS and Android file-system images."""

__version__ = "0.1.0"
