"""The visualization-state tools over JSON-RPC 2.0 (newline-delimited, MCP-style).

Each connection gets its own :class:`Engine`, so a client only ever sees plot ids
it created. ``tools/call`` results carry the tool payload in ``structuredContent``
and, as text, in ``content``; tool failures come back with ``isError`` set and a
stable error ``code``.
"""

from __future__ import annotations

import json
import logging
import sys
from typing import IO, Any, Callable

from vizstate import __version__
from vizstate.errors import VizStateError
from vizstate.spec_model import figure_to_dict, parse_figure
from vizstate.view_state import EVENT_TYPES, Engine

log = logging.getLogger(__name__)

PROTOCOL_VERSION = "2024-11-05"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603


class ToolError(VizStateError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


_PLOT_ID = {"type": "integer", "description": "Plot identifier returned by show_plot."}


def _bounds(axis_desc: str) -> dict:
    return {
        "x_min": {"type": "number", "description": f"Lower x {axis_desc} bound."},
        "x_max": {"type": "number", "description": f"Upper x {axis_desc} bound."},
        "y_min": {"type": "number", "description": f"Lower y {axis_desc} bound."},
        "y_max": {"type": "number", "description": f"Upper y {axis_desc} bound."},
    }


TOOLS: list[dict] = [
    {
        "name": "show_plot",
        "description": "Creates a figure from a Plotly-style specification; returns plot_id.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "figure": {
                    "type": ["object", "string"],
                    "description": "Figure specification {data: [...], layout: {...}}, as an object or JSON text.",
                },
                "plotly_codes": {
                    "type": "string",
                    "description": "Alternative to figure: figure JSON as text. Code is never executed.",
                },
            },
            "required": [],
        },
    },
    {
        "name": "get_plot_image",
        "description": "Returns the path of an SVG render of the current view, or of a past interaction.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "plot_id": _PLOT_ID,
                "interaction_id": {"type": "integer", "description": "Interaction snapshot id; latest view if omitted."},
            },
            "required": ["plot_id"],
        },
    },
    {
        "name": "get_plot_json",
        "description": "Returns the full figure specification with the current view state applied.",
        "inputSchema": {"type": "object", "properties": {"plot_id": _PLOT_ID}, "required": ["plot_id"]},
    },
    {
        "name": "relayout",
        "description": "Zoom/pan: sets axis range bounds.",
        "inputSchema": {
            "type": "object",
            "properties": {"plot_id": _PLOT_ID, **_bounds("range")},
            "required": ["plot_id"],
        },
    },
    {
        "name": "legendclick",
        "description": "Toggles the visibility of one trace.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "plot_id": _PLOT_ID,
                "curve_number": {"type": "integer", "description": "Zero-based trace index."},
            },
            "required": ["plot_id", "curve_number"],
        },
    },
    {
        "name": "selected",
        "description": "Box selection; returns the data points inside the region.",
        "inputSchema": {
            "type": "object",
            "properties": {"plot_id": _PLOT_ID, **_bounds("selection")},
            "required": ["plot_id"],
        },
    },
    {
        "name": "query_interactions",
        "description": "Returns the chronological interaction history.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "plot_id": _PLOT_ID,
                "event_type": {"type": "string", "enum": list(EVENT_TYPES), "description": "Only events of this type."},
            },
            "required": ["plot_id"],
        },
    },
]

TOOL_NAMES = tuple(t["name"] for t in TOOLS)
_SCHEMAS = {t["name"]: t["inputSchema"] for t in TOOLS}


def list_tools() -> list[dict]:
    return json.loads(json.dumps(TOOLS))


def _check_args(name: str, args: Any) -> dict:
    if not isinstance(args, dict):
        raise ToolError("INVALID_ARGS", "arguments must be an object")
    schema = _SCHEMAS[name]
    props = schema["properties"]
    unknown = sorted(set(args) - set(props))
    if unknown:
        raise ToolError("INVALID_ARGS", f"unexpected arguments: {', '.join(unknown)}")
    for key in schema["required"]:
        if args.get(key) is None:
            raise ToolError("INVALID_ARGS", f"missing required argument {key!r}")
    for key, value in args.items():
        if value is None:
            continue
        kind = props[key]["type"]
        kinds = kind if isinstance(kind, list) else [kind]
        ok = False
        for k in kinds:
            if k == "integer":
                ok |= isinstance(value, int) and not isinstance(value, bool)
            elif k == "number":
                ok |= isinstance(value, (int, float)) and not isinstance(value, bool)
            elif k == "string":
                ok |= isinstance(value, str)
            elif k == "object":
                ok |= isinstance(value, dict)
        if not ok:
            raise ToolError("INVALID_ARGS", f"argument {key!r} must be {' or '.join(kinds)}")
    return {k: v for k, v in args.items() if v is not None}


class Dispatcher:
    """Routes tool calls to one engine and shapes the results."""

    def __init__(self, engine: Engine | None = None):
        self.engine = engine if engine is not None else Engine()
        self._handlers: dict[str, Callable[[dict], dict]] = {
            "show_plot": self._show_plot,
            "get_plot_image": self._get_plot_image,
            "get_plot_json": self._get_plot_json,
            "relayout": self._relayout,
            "legendclick": self._legendclick,
            "selected": self._selected,
            "query_interactions": self._query_interactions,
        }

    def dispatch(self, tool_name: str, args: dict | None = None) -> dict:
        """Run a tool. Raises :class:`VizStateError` subclasses carrying a stable ``code``."""
        if tool_name not in self._handlers:
            raise ToolError("UNKNOWN_TOOL", f"unknown tool {tool_name!r}")
        args = _check_args(tool_name, args if args is not None else {})
        try:
            return self._handlers[tool_name](args)
        except ValueError as exc:
            raise ToolError("INVALID_ARGS", str(exc)) from None

    def _show_plot(self, args: dict) -> dict:
        given = [k for k in ("figure", "plotly_codes") if k in args]
        if len(given) != 1:
            raise ToolError("INVALID_ARGS", "show_plot needs exactly one of 'figure' or 'plotly_codes'")
        return {"plot_id": self.engine.create_plot(parse_figure(args[given[0]]))}

    def _get_plot_image(self, args: dict) -> dict:
        path = self.engine.render_at(args["plot_id"], args.get("interaction_id"))
        return {"image_path": str(path)}

    def _get_plot_json(self, args: dict) -> dict:
        return figure_to_dict(self.engine.get_plot_json(args["plot_id"]))

    def _relayout(self, args: dict) -> dict:
        event = self.engine.relayout(
            args["plot_id"], args.get("x_min"), args.get("x_max"), args.get("y_min"), args.get("y_max")
        )
        return {"success": True, "interaction_id": event.id}

    def _legendclick(self, args: dict) -> dict:
        event = self.engine.legendclick(args["plot_id"], args["curve_number"])
        return {"success": True, "interaction_id": event.id}

    def _selected(self, args: dict) -> dict:
        result = self.engine.selected(
            args["plot_id"], args.get("x_min"), args.get("x_max"), args.get("y_min"), args.get("y_max")
        )
        return result.to_dict()

    def _query_interactions(self, args: dict) -> dict:
        events = self.engine.query_interactions(args["plot_id"], args.get("event_type"))
        return {"events": [e.to_dict() for e in events]}


def _error(req_id: Any, code: int, message: str, data: Any = None) -> dict:
    err: dict = {"code": code, "message": message}
    if data is not None:
        err["data"] = data
    return {"jsonrpc": "2.0", "id": req_id, "error": err}


def _result(req_id: Any, result: Any) -> dict:
    return {"jsonrpc": "2.0", "id": req_id, "result": result}


def tool_result(payload: dict, is_error: bool = False) -> dict:
    return {
        "content": [{"type": "text", "text": json.dumps(payload, sort_keys=True)}],
        "structuredContent": payload,
        "isError": is_error,
    }


class Connection:
    """JSON-RPC state for one client."""

    def __init__(self, engine: Engine | None = None):
        self.dispatcher = Dispatcher(engine)

    def handle_line(self, line: str) -> str | None:
        """Process one frame; returns the response frame, or None for notifications."""
        try:
            message = json.loads(line)
        except json.JSONDecodeError as exc:
            return json.dumps(_error(None, PARSE_ERROR, f"Parse error: {exc.msg}"))
        if isinstance(message, list):
            if not message:
                return json.dumps(_error(None, INVALID_REQUEST, "Invalid Request: empty batch"))
            replies = [r for r in (self.handle_message(m) for m in message) if r is not None]
            return json.dumps(replies) if replies else None
        reply = self.handle_message(message)
        return None if reply is None else json.dumps(reply)

    def handle_message(self, message: Any) -> dict | None:
        if not isinstance(message, dict) or message.get("jsonrpc") != "2.0" or not isinstance(message.get("method"), str):
            req_id = message.get("id") if isinstance(message, dict) else None
            return _error(req_id, INVALID_REQUEST, "Invalid Request")
        is_notification = "id" not in message
        req_id = message.get("id")
        try:
            result = self._call(message["method"], message.get("params"))
        except _RpcError as exc:
            return None if is_notification else _error(req_id, exc.code, exc.message, exc.data)
        except Exception as exc:  # noqa: BLE001 - a bad call must not kill the loop
            log.exception("internal error handling %s", message.get("method"))
            return None if is_notification else _error(req_id, INTERNAL_ERROR, f"Internal error: {exc}")
        return None if is_notification else _result(req_id, result)

    def _call(self, method: str, params: Any) -> Any:
        if params is None:
            params = {}
        if method == "initialize":
            return {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {}},
                "serverInfo": {"name": "vizstate", "version": __version__},
            }
        if method.startswith("notifications/"):
            return None
        if method == "ping":
            return {}
        if method == "tools/list":
            return {"tools": list_tools()}
        if method == "tools/call":
            if not isinstance(params, dict) or not isinstance(params.get("name"), str):
                raise _RpcError(INVALID_PARAMS, "Invalid params: tools/call needs a tool name")
            return self._call_tool(params["name"], params.get("arguments", {}))
        if method in TOOL_NAMES:
            return self._call_tool(method, params)
        raise _RpcError(METHOD_NOT_FOUND, f"Method not found: {method}")

    def _call_tool(self, name: str, args: Any) -> dict:
        try:
            payload = self.dispatcher.dispatch(name, args)
        except VizStateError as exc:
            return tool_result({"error": {"code": exc.code, "message": str(exc)}}, is_error=True)
        return tool_result(payload)


class _RpcError(Exception):
    def __init__(self, code: int, message: str, data: Any = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.data = data


def serve(stdin: IO[str] | None = None, stdout: IO[str] | None = None, engine: Engine | None = None) -> int:
    """Serve one connection until end of input. Returns a process exit status."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    conn = Connection(engine)
    try:
        for line in stdin:
            if not line.strip():
                continue
            reply = conn.handle_line(line)
            if reply is not None:
                stdout.write(reply + "\n")
                stdout.flush()
    except (OSError, ValueError) as exc:
        log.error("transport failure: %s", exc)
        return 1
    return 0
