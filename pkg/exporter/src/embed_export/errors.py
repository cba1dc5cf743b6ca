"""Typed errors for the embedding exporter."""


class ExportError(Exception):
    """Base class for exporter failures."""


class EncoderUnavailable(ExportError):
    """The requested encoder could not be loaded."""


class PromptTooLong(ExportError):
    """A prompt tokenizes to more tokens than the padded length allows."""

    def __init__(self, prompt: str, token_count: int, max_length: int):
        self.prompt = prompt
        self.token_count = token_count
        self.max_length = max_length
        super().__init__(
            f"prompt needs {token_count} tokens but max length is {max_length}: "
            f"{prompt[:60]!r}"
        )
