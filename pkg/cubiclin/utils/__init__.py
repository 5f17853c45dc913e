"""Configuration and serialization helpers"""
