"""Truncated Fock-space states, operators and metrics"""
