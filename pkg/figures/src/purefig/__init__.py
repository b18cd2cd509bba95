"""Figures from purebudget sweep CSV exports."""

from .render import FigureSpec, RenderResult, load_csv, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "RenderResult", "load_csv", "render"]
