"""
sphereconvex: convex bodies in spherical space and space forms through
gnomonic charts.
"""
__version__ = "1.0.0"
