"""Covering times of generalized coupon collectors."""

__version__ = "0.1.0"
