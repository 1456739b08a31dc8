#!/usr/bin/env python3
#
# dynrmt documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import io
import os
import re
import sys

# Make the package importable for autodoc.
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration -----------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'dynrmt'
copyright = u'2024, the dynrmt developers'

# The full version, including alpha/beta/rc tags.
with io.open('../dynrmt/__init__.py', encoding='utf8') as version_file:
    version_match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]", version_file.read(), re.M)
    if version_match:
        release = version_match.group(1)
    else:
        raise RuntimeError("Unable to find version string.")

# The short X.Y version.
version = '.'.join(release.split('.')[:2])

autoclass_content = 'both'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

try:
    import sphinx_rtd_theme
    html_theme = "sphinx_rtd_theme"
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
except ImportError:
    # The sphinx-rtd-theme package is not installed, so to the default
    pass

htmlhelp_basename = 'dynrmtdoc'

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
    ('index', 'dynrmt.tex', u'dynrmt Documentation', u'the dynrmt developers', 'manual'),
]

man_pages = [
    ('index', 'dynrmt', u'dynrmt Documentation', [u'the dynrmt developers'], 1)
]

# -- Spelling ------------------------------------------------------------------

if 'spelling' in sys.argv:
    extensions.append("sphinxcontrib.spelling")

spelling_lang = 'en_US'
spelling_ignore_pypi_package_names = True
