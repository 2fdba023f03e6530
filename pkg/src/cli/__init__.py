"""Command-line driver"""
