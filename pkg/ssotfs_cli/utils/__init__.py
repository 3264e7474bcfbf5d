from ssotfs_cli.utils.errors import ConfigurationError, InvalidInputError, UnsupportedInputError

__all__ = ["ConfigurationError", "InvalidInputError", "UnsupportedInputError"]
