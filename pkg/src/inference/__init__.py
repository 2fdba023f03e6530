"""Bayesian inference over circular phase variables"""
