#!/usr/bin/env python3
"""
CRS-NOMA Setup Script
"""

import os
import subprocess
import sys


def install_requirements():
    """Install Python requirements"""
    print("📦 Installing Python requirements...")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("✅ Requirements installed successfully!")
    except subprocess.CalledProcessError as e:
        print(f"❌ Error installing requirements: {e}")
        return False
    return True


def setup_environment():
    """Set up environment file"""
    print("🔧 Setting up environment...")

    if not os.path.exists(".env"):
        with open(".env.example", "r") as example:
            content = example.read()

        with open(".env", "w") as env_file:
            env_file.write(content)

        print("✅ Created .env file from template")
        print("⚠️  Edit .env to change trial counts, seed or worker cap")
    else:
        print("✅ .env file already exists")
    return True


def create_directories():
    """Create the results directory"""
    print("📁 Creating directories...")
    os.makedirs("results", exist_ok=True)
    print("✅ Created results/ directory")
    return True


def test_setup():
    """Import every module and evaluate one closed-form point"""
    print("🧪 Testing setup...")

    try:
        from analytic_rates import rate_result
        from config import Config
        from crs_engine import build_parser
        from model import SystemConfig
        import oracle
        import validation

        presets = Config.load_presets()
        print(f"✅ All modules imported, {len(presets['presets'])} presets available")

        result = rate_result(SystemConfig.reference_default(), 100.0, "SC")
        print(f"✅ NOMA-SC 1x1 sum rate at 20 dB: {result.c_sum:.4f} bits/s/Hz")
        return True
    except (ImportError, OSError) as e:
        print(f"❌ Setup check failed: {e}")
        return False


def main():
    """Main setup function"""
    print("🚀 CRS-NOMA Setup")
    print("=" * 40)

    steps = [
        ("Installing requirements", install_requirements),
        ("Setting up environment", setup_environment),
        ("Creating directories", create_directories),
        ("Testing setup", test_setup),
    ]

    for step_name, step_func in steps:
        print(f"\n{step_name}...")
        if not step_func():
            print(f"❌ Setup failed at: {step_name}")
            return False

    print("\n🎉 Setup completed successfully!")
    print("\nNext steps:")
    print("1. Run: python crs_engine.py --preset paper-fig2a --out results/fig2a.csv")
    print("2. Run: python crs_engine.py --validate")
    print("3. Run: pytest")

    return True


_SETUPTOOLS_COMMANDS = {"egg_info", "dist_info", "editable_wheel", "bdist_wheel", "sdist", "build", "build_py", "install", "develop"}

if __name__ == "__main__" and _SETUPTOOLS_COMMANDS.intersection(sys.argv[1:]):
    # Invoked by a build backend (pip install): package metadata lives in pyproject.toml
    from setuptools import setup

    setup()
elif __name__ == "__main__":
    sys.exit(0 if main() else 1)
