"""gddforge: game design documents in, packaged Unity C# script templates out."""

__version__ = "0.1.0"
