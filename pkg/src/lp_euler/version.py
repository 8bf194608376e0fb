# This file is automatically generated by lp-euler's setup.py.
short_version = '0.1.0'
version = '0.1.0'
release = True
field_format_version = 1
