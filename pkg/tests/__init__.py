"""Test suite for awesome-ai-news."""
