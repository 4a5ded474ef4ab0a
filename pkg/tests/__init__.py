"""Unit tests for the Shapelet Segment Explainer"""
