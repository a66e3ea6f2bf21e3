"""Exact interval covers and finite nest-algebra numerics."""
from .errors import NestkitError
from .intervals import Family, Interval, OrderMap, interval
from .nest import BlockOperator, GridInterval, NestGrid

__all__ = ["NestkitError", "Family", "Interval", "OrderMap", "interval",
           "BlockOperator", "GridInterval", "NestGrid"]
__version__ = "0.1.0"
