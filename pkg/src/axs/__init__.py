"""Real-time accessibility mediation pipeline: chunked transcription,
translation, emotion tagging, sign-language animation, and meeting
summaries behind a WebSocket gateway."""

__version__ = "0.1.0"
