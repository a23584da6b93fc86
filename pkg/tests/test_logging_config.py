import json
import logging

from logging_config import ColoredFormatter, CommandLoggingContext, JSONFormatter, get_logger, get_logging_config


def _record(msg="solved %s", args=("ok",), level=logging.INFO):
    return logging.LogRecord("lq_stackelberg.test", level, __file__, 10, msg, args, None)


def test_logger_namespace():
    assert get_logger("command").name == "lq_stackelberg.command"


def test_json_formatter_keeps_extra_fields():
    record = _record()
    record.run_id = "abc"
    record.stage = 3
    entry = json.loads(JSONFormatter().format(record))
    assert entry["message"] == "solved ok"
    assert entry["level"] == "INFO"
    assert entry["run_id"] == "abc"
    assert entry["extra"] == {"run_id": "abc", "stage": 3}


def test_json_formatter_without_extra():
    entry = json.loads(JSONFormatter().format(_record()))
    assert "extra" not in entry
    assert "run_id" not in entry


def test_colored_formatter_can_be_plain():
    line = ColoredFormatter(use_color=False).format(_record(level=logging.WARNING))
    assert "\033[" not in line
    assert "WARNING" in line and line.endswith("solved ok")


def test_file_handlers_only_with_log_file(tmp_path):
    without = get_logging_config(log_level="INFO")
    assert set(without["handlers"]) == {"console"}
    assert without["handlers"]["console"]["stream"] == "ext://sys.stderr"

    log_file = tmp_path / "logs" / "run.log"
    with_file = get_logging_config(log_level="INFO", log_file=str(log_file))
    assert set(with_file["handlers"]) == {"console", "file", "error_file"}
    assert with_file["handlers"]["error_file"]["filename"] == str(tmp_path / "logs" / "run_errors.log")
    assert set(with_file["root"]["handlers"]) == {"console", "file", "error_file"}
    assert log_file.parent.is_dir()


def test_command_context_logs_start_and_completion(caplog):
    # CLI tests reconfigure the root logger, so capture on the command logger itself
    logger = logging.getLogger("lq_stackelberg.command")
    propagate = logger.propagate
    logger.addHandler(caplog.handler)
    logger.propagate = False
    try:
        with caplog.at_level(logging.INFO, logger="lq_stackelberg.command"):
            with CommandLoggingContext("abc", "solve", "spec.json") as context:
                context.log_info("halfway")
    finally:
        logger.removeHandler(caplog.handler)
        logger.propagate = propagate
    messages = [r.getMessage() for r in caplog.records]
    assert messages == ["Command started: solve spec.json", "halfway", "Command completed: solve spec.json"]
    assert all(r.run_id == "abc" for r in caplog.records)
    assert caplog.records[-1].duration_seconds >= 0.0
