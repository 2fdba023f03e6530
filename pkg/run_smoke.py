#!/usr/bin/env python3
"""
Smoke run of every laser phase laboratory experiment
"""

import sys
import os
import tempfile
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import EXPERIMENT_DEFAULTS
from src.cli.main import main
import logging

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

def run_experiment(experiment, out_dir, seed="2024"):
    """Run one subcommand with the smoke preset"""
    logger.info(f"🧪 Running {experiment}...")
    code = main([experiment, "--seed", seed, "--preset", "smoke", "--out", out_dir, "--log-level", "WARNING"])
    if code == 0:
        logger.info(f"✅ {experiment} passed")
    else:
        logger.error(f"❌ {experiment} exited with status {code}")
    return code

def main_smoke():
    """Run the smoke preset of every experiment"""
    logger.info("🚀 Starting laser phase laboratory smoke run")
    print("=" * 60)

    out_dir = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="laserlab_")
    results = {experiment: run_experiment(experiment, out_dir) for experiment in EXPERIMENT_DEFAULTS}

    print("=" * 60)
    logger.info("📊 Summary:")
    for experiment, code in results.items():
        logger.info(f"   {'✅' if code == 0 else '❌'} {experiment}: exit {code}")
    logger.info(f"📁 Reports written to {out_dir}")

    failed = [e for e, code in results.items() if code != 0]
    if failed:
        logger.error(f"❌ {len(failed)} experiment(s) failed: {', '.join(failed)}")
        return 1
    logger.info("🎉 All smoke runs passed")
    return 0

if __name__ == "__main__":
    sys.exit(main_smoke())
