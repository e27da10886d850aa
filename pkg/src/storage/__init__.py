"""
File formats for matrices, pairs, sampled elements, fields and traces.
"""
