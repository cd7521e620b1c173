"""
API Package - REST route handlers

Routes are thin: they validate the request body, hand the problem config
to the services and return the structured documents the CLI also emits.
"""
