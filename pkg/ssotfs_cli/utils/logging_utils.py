import logging
import os

from colorama import Fore, Style

LOG_FORMAT = "%(asctime)s [%(levelname)s] - %(message)s"


class ColorFormatter(logging.Formatter):
    COLOR_MAP = {
        logging.DEBUG: Fore.CYAN,
        logging.INFO: Fore.GREEN,
        logging.WARNING: Fore.YELLOW,
        logging.ERROR: Fore.RED,
        logging.CRITICAL: Fore.MAGENTA,
    }

    def format(self, record):
        color = self.COLOR_MAP.get(record.levelno, Fore.WHITE)
        formatted = super().format(record)
        return f"{color}{formatted}{Style.RESET_ALL}"


def configure_global_logger(log_dir: str = "logs", level: int = logging.INFO) -> logging.Logger:
    """Configures the root logger with a file handler and a colored console handler."""
    os.makedirs(log_dir, exist_ok=True)
    logger = logging.getLogger()
    logger.setLevel(level)

    for handler in list(logger.handlers):
        if getattr(handler, "_ssotfs", False):
            logger.removeHandler(handler)
            handler.close()

    log_file = os.path.join(log_dir, "ssotfs.log")
    file_handler = logging.FileHandler(log_file)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    file_handler._ssotfs = True
    logger.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(ColorFormatter(LOG_FORMAT))
    console_handler._ssotfs = True
    logger.addHandler(console_handler)

    return logger
