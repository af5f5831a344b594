"""Human-rating collection: durable store plus HTTP service."""

from .store import AnnotationStore, DuplicateRating, RatingAck, Study, StudyItem, task_id_for
from .service import create_app

__all__ = [
    "AnnotationStore",
    "DuplicateRating",
    "RatingAck",
    "Study",
    "StudyItem",
    "create_app",
    "task_id_for",
]
