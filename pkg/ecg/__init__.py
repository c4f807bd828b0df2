"""Two-channel fetal ECG separation pipeline built on the difference operator."""
