import json
import logging
import os
import re
import traceback
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone

from claims_reserving import hooks
from claims_reserving.constants import LOG_DIR_ENV, LOG_FILE_NAME
from claims_reserving.utils import dumps, logger

_TAG_RE = re.compile(r"<[^>]+>")
_LEVELS = {"Error": logging.ERROR, "Queued": logging.DEBUG}


@dataclass
class ReservingLog:
    integration: str
    status: str = "Queued"
    method: str | None = None
    message: str | None = None
    title: str | None = None
    request_data: str | None = None
    response_data: str | None = None
    traceback: str | None = None
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def validate(self):
        self._set_title()

    def _set_title(self):
        title = None
        if self.message and self.message != "None":
            title = self.message

        if not title and self.method:
            title = self.method.split(".")[-1]

        if title:
            title = strip_html(title)
            self.title = title if len(title) < 100 else title[:100] + "..."

    def as_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def clear_old_logs(days: int | None = None, log_dir: str | None = None) -> int:
        """Drop successful records older than `days`; returns how many were removed."""
        path = get_log_path(log_dir)
        if not path or not os.path.exists(path):
            return 0

        days = hooks.default_log_clearing_days if days is None else days
        cutoff = datetime.now(timezone.utc) - timedelta(days=days)
        kept, removed = [], 0
        with open(path) as f:
            for line in f:
                if not line.strip():
                    continue
                record = json.loads(line)
                if record.get("status") == "Success" and datetime.fromisoformat(record["created"]) < cutoff:
                    removed += 1
                    continue
                kept.append(line.rstrip("\n"))

        with open(path, "w") as f:
            f.writelines(line + "\n" for line in kept)
        return removed


def create_log(
    module_def=None,
    status="Queued",
    response_data=None,
    request_data=None,
    exception=None,
    method=None,
    message=None,
    log_dir=None,
):
    log = ReservingLog(integration=str(module_def or ""))

    if response_data is not None and not isinstance(response_data, str):
        response_data = dumps(response_data)

    if request_data is not None and not isinstance(request_data, str):
        request_data = dumps(request_data)

    log.message = message or (_get_message(exception) if exception else None)
    log.method = method
    log.response_data = response_data
    log.request_data = request_data
    if exception is not None:
        log.traceback = "".join(traceback.format_exception(type(exception), exception, exception.__traceback__))
    log.status = status
    log.validate()

    logger(log.integration).log(_LEVELS.get(status, logging.INFO), "[%s] %s", status, log.title or "")

    path = get_log_path(log_dir)
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "a") as f:
            f.write(json.dumps(log.as_dict(), sort_keys=True) + "\n")

    return log


def get_log_path(log_dir: str | None = None) -> str | None:
    log_dir = log_dir or os.environ.get(LOG_DIR_ENV)
    if not log_dir:
        return None
    return os.path.join(log_dir, LOG_FILE_NAME)


def strip_html(text: str) -> str:
    return _TAG_RE.sub("", text)


def _get_message(exception):
    if hasattr(exception, "message"):
        return strip_html(str(exception.message))
    elif hasattr(exception, "__str__"):
        return strip_html(exception.__str__())
    else:
        return "Something went wrong while reserving"
