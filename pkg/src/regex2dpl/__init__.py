"""regex2dpl: convert log-parsing regexes to a non-backtracking pattern language.

The toolkit parses a PCRE subset, classifies how faithfully each pattern can
be expressed with possessive-only matching, emits the converted pattern,
checks the conversion by differential testing against a backtracking
reference matcher, and suggests high-level matcher replacements for exported
fields.
"""

__version__ = "0.1.0"
