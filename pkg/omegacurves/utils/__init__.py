"""Shared helpers: linear algebra, sampling, seeding, validation and provenance"""
