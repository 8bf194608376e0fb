#!/usr/bin/env python

import os
import subprocess
import sys

# Required third-party imports, must be specified in pyproject.toml.
import packaging.version
from setuptools import setup

# Version of the binary field-file layout written by ``lp_euler.core``.
FIELD_FORMAT_VERSION = 1


def read_version(rootdir):
    """
    Read the ``VERSION`` file next to this script and return a tuple
    ``(short_version, version, release)``.

    Development builds (``.devN``) get the short git hash appended as a local
    version label, or ``nogit`` when git is unavailable.
    """
    with open(os.path.join(rootdir, "VERSION"), "r") as version_file:
        version_string = version_file.read().strip()
    version = packaging.version.parse(version_string)
    release = not version.is_devrelease
    full_version = str(version)
    if not release:
        try:
            git_out = subprocess.run(
                ("git", "rev-parse", "--verify", "--short=7", "HEAD"),
                check=True,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
            )
            git_hash = git_out.stdout.decode(sys.stdout.encoding).strip()
        except (subprocess.CalledProcessError, OSError):
            git_hash = ""
        full_version += "+" + (git_hash or "nogit")
    return str(version.public), full_version, release


def write_version_py(rootdir, short_version, version, release):
    """
    Write ``src/lp_euler/version.py``, overwriting any existing file.
    """
    filename = os.path.join(rootdir, "src", "lp_euler", "version.py")
    content = "\n".join(
        [
            "# This file is automatically generated by lp-euler's setup.py.",
            f"short_version = '{short_version}'",
            f"version = '{version}'",
            f"release = {release}",
            f"field_format_version = {FIELD_FORMAT_VERSION}",
        ]
    )
    with open(filename, "w") as file:
        print(content, file=file)


if __name__ == "__main__":
    rootdir = os.path.dirname(os.path.abspath(__file__))
    short_version, version, release = read_version(rootdir)
    write_version_py(rootdir, short_version, version, release)
    # Everything else is declared in setup.cfg.
    setup(version=version)
