#
# Configuration file for the Sphinx documentation builder.
#
# This file does only contain a selection of the most common options. For a
# full list see the documentation:
# http://www.sphinx-doc.org/en/master/config
# -- Path setup --------------------------------------------------------------
import os
import sys

import minsumkd.__version__ as meta

# -- Project information -----------------------------------------------------

project = "minsumkd"
copyright = "2026, minsumkd contributors"
author = "minsumkd contributors"

# The short X.Y version
version = f"minsumkd v{meta.__version__}"
# The full version, including alpha/beta/rc tags
release = f"minsumkd v{meta.__version__}"


# -- General configuration ---------------------------------------------------

needs_sphinx = "4.4.0"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "myst_parser",
    "sphinx_click",
]

# Add myst_parser types to suppress warnings
suppress_warnings = ["myst.header"]

source_suffix = [".rst", ".md"]

master_doc = "index"

language = "en"

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

pygments_style = None

# generate header anchors
myst_heading_anchors = 4

# enables $...$ math in the guides
myst_enable_extensions = ["dollarmath"]

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"

html_theme_options = {
    "navigation_depth": 4,
    "titles_only": True,
    "collapse_navigation": False,
}


def setup(app):
    pass


sys.path.insert(0, os.path.abspath(".."))
