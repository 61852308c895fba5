# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

import logging

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Settings:
    """Output settings of the command-line interface.

    Attributes:
        is_verbose: Report progress (one line per iteration and per written file). Defaults to False.
        is_debug: Enable debug logging, including oracle node counts. Defaults to False.
    """
    is_verbose: bool = False
    is_debug: bool = False

    @property
    def log_level(self) -> int:
        if self.is_debug:
            return logging.DEBUG
        if self.is_verbose:
            return logging.INFO
        return logging.WARNING

    def configure_logging(self) -> None:
        logging.basicConfig(level=self.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)
