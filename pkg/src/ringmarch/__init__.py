"""Collective marching of locust-like agents on a ring cylinder."""
