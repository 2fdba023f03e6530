"""Laser Phase Lab - Core package"""
