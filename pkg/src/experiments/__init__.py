"""Seeded experiments and their reports"""
