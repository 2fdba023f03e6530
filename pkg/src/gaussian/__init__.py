"""Gaussian covariance formalism: closed forms and cross-checks"""
