# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from pathlib import Path

from streamforge.spec.enums import ProducerMode
from streamforge.utils.exceptions import IoError
from streamforge.utils.generic_utils import natural_key
from streamforge.utils.io_utils import read_text
from streamforge.utils.logger import LOGGER


def read_payloads(mode: str, path: Path) -> list[str]:
    """
    Text payloads of a file based producer.

    Parameters
    ----------
    mode : str
        lineOfFile (one payload per non empty line) or fileOfDirectory
        (one payload per file, files in natural name order).
    path : Path
        File or directory.

    Returns
    -------
    list[str]
        Payloads in emission order.

    Raises
    ------
    IoError
        If the path cannot be read.
    """
    try:
        if mode == ProducerMode.LINE_OF_FILE.value:
            return [line for line in read_text(path).splitlines() if line.strip()]
        if mode == ProducerMode.FILE_OF_DIRECTORY.value:
            files = sorted((p for p in Path(path).iterdir() if p.is_file()), key=lambda p: natural_key(p.name))
            return [read_text(p) for p in files]
    except OSError as err:
        LOGGER.exception(f"Cannot read producer input {path}.")
        raise IoError(f"Cannot read producer input {path}: {err}") from err
    raise IoError(f"Producer mode '{mode}' does not read files.")


def payload_size(payload: str) -> int:
    return max(1, len(payload.encode("utf-8")))
