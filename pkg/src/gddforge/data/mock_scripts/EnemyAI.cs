using UnityEngine;

public class EnemyAI : MonoBehaviour
{
    [SerializeField] private float patrolSpeed = 2f;
    [SerializeField] private float chaseSpeed = 4f;
    [SerializeField] private float detectionRange = 6f;
    [SerializeField] private float attackRange = 1.2f;
    [SerializeField] private Transform[] patrolPoints;

    private Transform playerTransform;
    private CombatSystem combat;
    private int patrolIndex;

    private void Awake()
    {
        combat = GetComponent<CombatSystem>();
        PlayerController player = FindObjectOfType<PlayerController>();
        if (player != null)
        {
            playerTransform = player.transform;
        }
    }

    private void Update()
    {
        float distance = DistanceToPlayer();
        if (distance <= attackRange)
        {
            AttackPlayer();
        }
        else if (distance <= detectionRange)
        {
            ChasePlayer();
        }
        else
        {
            Patrol();
        }
    }

    public float DistanceToPlayer()
    {
        if (playerTransform == null)
        {
            return float.MaxValue;
        }
        return Vector2.Distance(transform.position, playerTransform.position);
    }

    public void Patrol()
    {
        if (patrolPoints == null || patrolPoints.Length == 0)
        {
            return;
        }
        Transform point = patrolPoints[patrolIndex];
        transform.position = Vector2.MoveTowards(transform.position, point.position, patrolSpeed * Time.deltaTime);
        if (Vector2.Distance(transform.position, point.position) < 0.1f)
        {
            patrolIndex = (patrolIndex + 1) % patrolPoints.Length;
        }
    }

    public void ChasePlayer()
    {
        if (playerTransform != null)
        {
            transform.position = Vector2.MoveTowards(transform.position, playerTransform.position, chaseSpeed * Time.deltaTime);
        }
    }

    private void AttackPlayer()
    {
        if (combat != null)
        {
            combat.Attack();
        }
    }
}
