using UnityEngine;

public class PlayerMovement2D : MonoBehaviour
{
    [SerializeField] private float moveSpeed = 7f;
    [SerializeField] private float jumpForce = 14f;
    [SerializeField] private LayerMask groundMask;

    private Rigidbody2D body;
    private bool grounded;

    private void Awake()
    {
        body = GetComponent<Rigidbody2D>();
    }

    private void Update()
    {
        float x = Input.GetAxisRaw("Horizontal");
        body.velocity = new Vector2(x * moveSpeed, body.velocity.y);
        if (Input.GetButtonDown("Jump") && grounded)
        {
            Jump();
        }
    }

    public void Jump()
    {
        body.velocity = new Vector2(body.velocity.x, jumpForce);
        grounded = false;
    }

    private void OnCollisionEnter(Collision collision)
    {
        grounded = true;
    }
}
