"""
API v1 endpoint modules (router-centric layout).
"""
