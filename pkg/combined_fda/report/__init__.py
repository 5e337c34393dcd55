"""Tables, JSON documents and SVG figures written by the CLI."""

from .export import ArtifactWriter, curves_frame, glued_frame

__all__ = ["ArtifactWriter", "curves_frame", "glued_frame"]
