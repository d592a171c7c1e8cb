""" SQLAlchemy models for the self-description sidecar cache. """

from sqlalchemy import Boolean, Column, Index, Integer, String, Text
from sqlalchemy.orm import declarative_base

Base = declarative_base()


class SelfDescription(Base):
    """ A synthesized "I like ..." preference passage for one instance, as produced by one
    generator model. """

    __tablename__ = 'selfDescriptions'
    id = Column(Integer, primary_key=True)
    instance_id = Column(String, nullable=False)
    generator_model = Column(String, nullable=False)
    text = Column(Text, nullable=False)
    length = Column(Integer, nullable=False)
    over_limit = Column(Boolean, nullable=False, default=False)

    # One cached passage per (instance, generator model)
    __table_args__ = (Index('instance_model_index', 'instance_id', 'generator_model', unique=True), )

    def to_json(self):
        return {
            'instance_id': self.instance_id,
            'generator_model': self.generator_model,
            'text': self.text,
            'length': self.length,
            'over_limit': self.over_limit
        }
