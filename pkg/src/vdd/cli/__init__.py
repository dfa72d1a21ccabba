"""Command-line interface: `vdd init|check|plan|run|impact|status|report|animate`."""
