"""Point-cloud video anomaly detection with a point spatio-temporal autoencoder.

Quick start::

    pstae gen-data
    pstae pretrain && pstae train
    pstae score && pstae eval
"""

__version__ = "0.1.0"
