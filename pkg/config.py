"""
Configuration settings for the Composite Refactoring Miner
"""
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Logging Configuration
LOG_LEVEL = os.environ.get("COMPOSITE_MINER_LOG", "warn")  # error, warn, info or debug
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
LOG_FILE = os.environ.get("COMPOSITE_MINER_LOG_FILE")  # Optional extra log file

# Dataset Filters
DEFAULT_EXCLUDED_PACKAGES = ["test", "sample", "docs"]  # Non-core packages
DEFAULT_EXCLUDE_CONSTRUCTORS = True

# Detection
DEFAULT_MIN_SIZE = 2
BRUTE_FORCE_MAX_RECORDS = 10000
SMALL_COMPOSITE_MAX_SIZE = 3  # "Small" composites in the size summary

# Reports
REPORT_SCHEMA_VERSION = "1"
REPORT_JSON = "report.json"
REPORT_MARKDOWN = "report.md"
DOT_DIR = "dot"
PLOTS_DIR = "plots"
EMIT_CHOICES = ["json", "markdown", "dot", "plots"]
DEFAULT_EMITS = ["json", "markdown"]
DEFAULT_OUT_DIR = "composite_report"

# Data
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
ORACLE_CSV_PATH = os.environ.get("COMPOSITE_MINER_ORACLE_CSV")  # Local oracle export, opt-in

# Synthetic datasets
SYNTH_OUT_DIR = "synth_dataset"
SYNTH_DATASET = "dataset.jsonl"
SYNTH_TRUTH = "truth.json"
DEFAULT_SYNTH_SINGLES = 100
