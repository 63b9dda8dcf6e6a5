"""
qdenoise: simulated noisy quantum states and a convolutional autoencoder that
learns to denoise them.
"""

__version__ = "1.0.0"
