"""Creativity scoring for Scratch 3 studios.

Parses collections of Scratch 3 projects, extracts their elements, and scores
each project on originality, elaboration and flexibility, combined into a
single creativity score normalized over the studio. Rankings can be compared
against an external metric via Kendall rank correlation.
"""

__version__ = "0.1.0"

TOOL_NAME = "scratchccs"
