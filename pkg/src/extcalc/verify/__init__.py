"""Scenario-driven verification harness."""
from .report import emit_report, from_json, to_dict, to_json, to_text
from .runner import Report, run_scenario
from .scenario import Scenario, load_scenario, parse_scenario
from .suites import SUITES
