from pathlib import Path


class BaseLogger:
    """Append-only text log of run events (one line per event)."""

    def __init__(self, log_file_name: str | Path = "run.log", clear: bool = True):
        self.log_file_name = Path(log_file_name)
        if clear:
            self.clear()

    def write_log(self, *args, sep=" ", end="\n"):
        message = sep.join(map(str, args)) + end
        with open(self.log_file_name, "a") as fp:
            fp.write(message)

    def write_event(self, event: str, **fields):
        body = " ".join(f"{k}={_format_value(v)}" for k, v in fields.items())
        self.write_log(f"[{event}]", body)

    def clear(self):
        self.log_file_name.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_file_name, "w"):
            pass


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
