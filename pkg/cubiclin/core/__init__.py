"""Exact algebra, subspaces and the analysis orchestrator"""
