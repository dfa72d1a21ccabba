"""Interactive machine animation: pick transitions, undo, save a scenario.

The session is a plain line protocol on stdin/stdout so it works the same
under a terminal and under tests.  Saved scenarios are `TRACE(...)` texts
that drop straight into an obligation file.
"""
from __future__ import annotations

from pathlib import Path

from vdd.specml.explore import StateSpace, Transition
from vdd.specml.values import fmt_value

_HELP = "commands: <number> take transition, undo, reset, save <file>, quit"


def _step_text(t: Transition) -> str:
    if not t.binding:
        return t.event
    args = ", ".join(fmt_value(v) for _, v in t.binding)
    return f"{t.event}({args})"


def _show_state(space: StateSpace, state, out) -> list[Transition]:
    print(f"state: ({space.fmt_state(state)})", file=out)
    options = space.successors(state)
    if not options:
        print("  (no enabled events)", file=out)
    for i, t in enumerate(options, start=1):
        print(f"  {i}) {t.label()}", file=out)
    return options


def _prompt(inp, out) -> str | None:
    print("> ", end="", file=out, flush=True)
    line = inp.readline()
    if line == "":
        return None
    return line.strip()


def _choose_initial(space: StateSpace, inp, out):
    if len(space.initial) == 1:
        return space.initial[0]
    print("choose an initial state:", file=out)
    for i, s in enumerate(space.initial, start=1):
        print(f"  {i}) ({space.fmt_state(s)})", file=out)
    while True:
        line = _prompt(inp, out)
        if line is None or line == "quit":
            return None
        if line.isdigit() and 1 <= int(line) <= len(space.initial):
            return space.initial[int(line) - 1]
        print("invalid selection", file=out)


def run_animation(space: StateSpace, inp, out) -> int:
    if not space.initial:
        print("machine has no initial state", file=out)
        return 3
    start = _choose_initial(space, inp, out)
    if start is None:
        return 0
    print(_HELP, file=out)
    history = [start]
    steps: list[str] = []
    options = _show_state(space, history[-1], out)
    while True:
        line = _prompt(inp, out)
        if line is None or line == "quit":
            return 0
        if line == "":
            continue
        if line == "undo":
            if len(history) > 1:
                history.pop()
                steps.pop()
            else:
                print("nothing to undo", file=out)
            options = _show_state(space, history[-1], out)
            continue
        if line == "reset":
            history = [history[0]]
            steps = []
            options = _show_state(space, history[-1], out)
            continue
        if line.startswith("save"):
            parts = line.split(None, 1)
            if len(parts) != 2:
                print("usage: save <file>", file=out)
                continue
            text = "TRACE(" + "; ".join(steps) + ")\n"
            try:
                Path(parts[1]).write_text(text)
            except OSError as exc:
                print(f"cannot save: {exc}", file=out)
                continue
            print(f"saved {len(steps)} step(s) to {parts[1]}", file=out)
            continue
        if line.isdigit() and 1 <= int(line) <= len(options):
            chosen = options[int(line) - 1]
            history.append(chosen.dst)
            steps.append(_step_text(chosen))
            options = _show_state(space, history[-1], out)
            continue
        print("invalid selection", file=out)
