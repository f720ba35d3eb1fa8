"""Random mod-p Dieudonne modules, Cartier-Manin surveys, and their limit laws."""

__version__ = "0.1.0"
