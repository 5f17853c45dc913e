"""The constructible family and its class-Z certificates"""
