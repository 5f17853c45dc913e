"""Cubic-linear maps, matrix class tests and Newton iteration"""
