import logging
import os
import sys
from datetime import datetime
from typing import Optional

from utils.config import LOG_DIR, LOG_LEVEL

logger = logging.getLogger("ddetect")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = LOG_DIR) -> None:
    """
    Configure root logging for a CLI invocation.

    Args:
        level: Level name overriding DDETECT_LOG_LEVEL
        log_dir: Directory for a dated log file; no file is written when None
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(
            logging.FileHandler(
                os.path.join(log_dir, f'ddetect_{datetime.now().strftime("%Y%m%d")}.log')
            )
        )
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def log_action(action: str, status: str, details: Optional[str] = None) -> None:
    """
    Log the outcome of a command.

    Args:
        action: The command being performed
        status: Status of the action (success/failure)
        details: Additional details about the action
    """
    try:
        log_message = f"Ran {action} with status {status}"
        if details:
            log_message += f" - Details: {details}"

        if status == "success":
            logger.info(log_message)
        else:
            logger.error(log_message)
    except Exception as e:
        logger.error(f"Error logging action: {str(e)}")
