"""Packetized laser beams"""
