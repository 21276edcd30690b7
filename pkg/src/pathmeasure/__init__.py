"""Classical paths, boundary-condition measures and the Independence Property."""

__version__ = "0.1.0"
